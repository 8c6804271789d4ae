from .experiment_cli import main

raise SystemExit(main())
