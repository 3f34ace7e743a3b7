import sys

from sepscan.cli import main

sys.exit(main())
