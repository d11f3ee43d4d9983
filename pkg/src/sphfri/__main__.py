import sys

from sphfri.cli import main

sys.exit(main())
