from unilab.cli import main

raise SystemExit(main())
