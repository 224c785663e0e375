import sys

from sicgram.cli import main

sys.exit(main())
