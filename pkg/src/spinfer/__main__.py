import sys

from spinfer.cli import main

sys.exit(main())
