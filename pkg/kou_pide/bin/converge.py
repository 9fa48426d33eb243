from absl import app
from kou_pide.bin import run_program
from kou_pide.cli import cmd_converge

__desc__ = 'Measures the temporal convergence of the splitting schemes in the region of interest.'


def main(unused_argv):
    return run_program(cmd_converge, 'converge')


def entry_point():
    app.run(main)


if __name__ == '__main__':
    app.run(main)
