import sys

from qfdesign.cli import main

sys.exit(main())
