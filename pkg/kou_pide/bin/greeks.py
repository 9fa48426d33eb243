from absl import app
from kou_pide.bin import run_program
from kou_pide.cli import cmd_greeks

__desc__ = 'Computes the Greek surfaces and, optionally, their temporal errors.'


def main(unused_argv):
    return run_program(cmd_greeks, 'greeks')


def entry_point():
    app.run(main)


if __name__ == '__main__':
    app.run(main)
