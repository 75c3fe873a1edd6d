"""Allow ``python -m astkit``."""

import sys

from astkit.cli import main

sys.exit(main())
