import sys

from eeot.cli import main

sys.exit(main())
