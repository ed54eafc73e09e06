import sys

from scanrig.cli import main

sys.exit(main())
