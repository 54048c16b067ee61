import sys

from eitls.cli import main

sys.exit(main())
