# -*- coding: utf-8 -*-
"""Run tests.

This module executes tools to test the package.
These tools involve pytest (a test-runner),
bandit (a security linter from PyCQA).

Example:
    Run this file from the command line:

        $ python tests.py
"""


import os


def main():
    os.system("pytest")
    os.system("bandit -r ./pydhtsp")


if __name__ == "__main__":
    main()
