from meaningspace.cli import main

raise SystemExit(main())
