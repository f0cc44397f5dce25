import sys

from nmrvoter.cli import main

sys.exit(main())
