import sys

from motirr.cli import main

sys.exit(main())
