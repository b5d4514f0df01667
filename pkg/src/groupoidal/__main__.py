from groupoidal.cli.main import main

raise SystemExit(main())
