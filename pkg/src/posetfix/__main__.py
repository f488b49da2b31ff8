import sys

from posetfix.cli import main

sys.exit(main())
