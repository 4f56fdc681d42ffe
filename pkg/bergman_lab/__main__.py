"""python -m bergman_lab"""

from bergman_lab.cli import main

raise SystemExit(main())
