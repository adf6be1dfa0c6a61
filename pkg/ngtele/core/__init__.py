# Core package