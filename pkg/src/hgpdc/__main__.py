import sys

from hgpdc.cli import main

sys.exit(main())
