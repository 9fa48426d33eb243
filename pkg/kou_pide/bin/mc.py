from absl import app
from kou_pide.bin import run_program
from kou_pide.cli import cmd_mc

__desc__ = 'Prices the option by Monte Carlo simulation of the two-asset jump-diffusion.'


def main(unused_argv):
    return run_program(cmd_mc, 'mc')


def entry_point():
    app.run(main)


if __name__ == '__main__':
    app.run(main)
