from absl import app
from kou_pide.bin import run_program
from kou_pide.cli import cmd_stability

__desc__ = 'Numerically verifies the stability bounds of the splitting schemes.'


def main(unused_argv):
    return run_program(cmd_stability, 'stability')


def entry_point():
    app.run(main)


if __name__ == '__main__':
    app.run(main)
