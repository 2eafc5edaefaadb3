from __future__ import annotations

from scanner.run_k3curves import main

raise SystemExit(main())
