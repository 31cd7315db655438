"""Allow `python -m mshw_forecast`."""

import sys

from mshw_forecast.cli import main

sys.exit(main())
