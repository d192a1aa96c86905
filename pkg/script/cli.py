#!/usr/bin/env python

import sys
sys.path.append(".")

from frictionfolio.ui.cli import main

if __name__ == '__main__':
    sys.exit(main())
