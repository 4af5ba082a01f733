import sys

from querypricing.cli import main

sys.exit(main())
