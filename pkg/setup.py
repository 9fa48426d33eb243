#!/usr/bin/env python

from setuptools import setup, find_packages

setup(name='kou-pide-splitting',
      version='1.0',
      description='Operator splitting time stepping schemes for pricing options on two assets under the '
                  'two-dimensional Kou jump-diffusion model',
      packages=find_packages(exclude=['tests']),
      install_requires=[
          'numpy',
          'pandas >= 1.5',
          'jsonpickle',
          'scipy >= 1.12',
          'absl-py',
          'tqdm',
          'joblib'
      ],
      extras_require={
          'test': [
              'pytest'
          ],
      },
      entry_points={
          'console_scripts': [
              'kou-price = kou_pide.bin.price:entry_point',
              'kou-converge = kou_pide.bin.converge:entry_point',
              'kou-greeks = kou_pide.bin.greeks:entry_point',
              'kou-stability = kou_pide.bin.stability:entry_point',
              'kou-mc = kou_pide.bin.mc:entry_point',
              'kou-bench-integral = kou_pide.bin.bench_integral:entry_point',
          ]
      },
      zip_safe=True
      )
