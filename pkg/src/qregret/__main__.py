import sys

from qregret.cli import main

sys.exit(main())
