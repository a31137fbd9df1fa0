import sys

from dfforge.cli import main

sys.exit(main())
