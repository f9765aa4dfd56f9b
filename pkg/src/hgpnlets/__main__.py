from __future__ import annotations

import sys

from hgpnlets.cli import main

sys.exit(main())
