import sys

from loopcount.cli import main

sys.exit(main())
