import sys

from robustkern.cli import main

sys.exit(main())
