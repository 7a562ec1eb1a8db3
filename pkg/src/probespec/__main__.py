"""Allow `python -m probespec`."""

import sys

from .cli import main

sys.exit(main())
