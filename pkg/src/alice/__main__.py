import sys

from alice.cli import main

sys.exit(main())
