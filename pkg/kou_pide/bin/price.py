from absl import app
from kou_pide.bin import run_program
from kou_pide.cli import cmd_price

__desc__ = 'Prices the option by solving the semidiscretized PIDE with one of the splitting schemes.'


def main(unused_argv):
    return run_program(cmd_price, 'price')


def entry_point():
    app.run(main)


if __name__ == '__main__':
    app.run(main)
