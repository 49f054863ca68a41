import sys

from ratelessrelay.cli import main

sys.exit(main())
