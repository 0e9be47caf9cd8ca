import sys

from abfode.cli import main

sys.exit(main())
