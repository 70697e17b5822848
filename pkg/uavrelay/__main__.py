from __future__ import annotations

from uavrelay.app import main

if __name__ == "__main__":
    main()
