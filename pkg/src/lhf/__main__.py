import sys

from lhf.cli import main

sys.exit(main())
