from absl import app
from kou_pide.bin import run_program
from kou_pide.cli import cmd_bench_integral

__desc__ = 'Times the evaluation of the two-dimensional jump integral.'


def main(unused_argv):
    return run_program(cmd_bench_integral, 'bench_integral')


def entry_point():
    app.run(main)


if __name__ == '__main__':
    app.run(main)
