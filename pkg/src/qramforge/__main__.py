"""Allow ``python -m qramforge`` to behave like the ``qramforge`` script."""

import sys

from .cli import main

sys.exit(main())
