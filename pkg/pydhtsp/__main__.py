# -*- coding: utf-8 -*-
"""Entry point of ``python -m pydhtsp``."""


import sys

from pydhtsp.cli import main


if __name__ == "__main__":
    sys.exit(main())
