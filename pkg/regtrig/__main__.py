import sys

from regtrig.cli import main

sys.exit(main())
