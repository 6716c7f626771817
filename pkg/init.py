#!/usr/bin/env python3

import argparse
import subprocess
import sys
from pathlib import Path
from typing import List, Optional, Tuple

try:
    from importlib.metadata import version, PackageNotFoundError
except ImportError:
    from importlib_metadata import version, PackageNotFoundError


def _parse_requirement(line: str) -> Tuple[str, Optional[str]]:
    for operator in ('>=', '=='):
        if operator in line:
            name, required = line.split(operator, 1)
            return name.strip(), required.strip()
    return line.strip(), None


def _version_ok(installed: str, required: Optional[str]) -> bool:
    if required is None:
        return True
    try:
        from packaging import version as pkg_version
    except ImportError:
        return True
    return pkg_version.parse(installed) >= pkg_version.parse(required)


def check_requirements(assume_yes: bool = False) -> bool:
    requirements_file = Path("requirements.txt")
    if not requirements_file.exists():
        print("❌ requirements.txt not found")
        return False

    with open(requirements_file, 'r') as f:
        requirements = [line.strip() for line in f if line.strip() and not line.startswith('#')]

    missing: List[str] = []
    installed: List[str] = []
    for requirement in requirements:
        name, required = _parse_requirement(requirement)
        if name == 'tomli' and sys.version_info >= (3, 11):
            continue
        try:
            found = version(name)
        except PackageNotFoundError:
            missing.append(requirement)
            continue
        if _version_ok(found, required):
            installed.append(f"{name} (v{found})")
        else:
            missing.append(requirement)

    if missing:
        print("❌ Missing required packages:")
        for requirement in missing:
            print(f"   - {requirement}")
        response = 'y' if assume_yes else input("\n📦 Install missing packages? (y/N): ").strip().lower()
        if response not in ['y', 'yes']:
            print("❌ Cannot run the laboratory without required packages")
            return False
        try:
            subprocess.check_call([sys.executable, '-m', 'pip', 'install'] + missing)
        except subprocess.CalledProcessError:
            print("❌ Failed to install packages")
            return False
        print("✅ Packages installed successfully")
        return True

    print("✅ All required packages are installed:")
    for name in installed:
        print(f"   ✓ {name}")
    return True


def main():
    parser = argparse.ArgumentParser(description='Check the environment and run the quick acceptance checks')
    parser.add_argument('--config', default='config.toml', help='Configuration file to validate')
    parser.add_argument('--yes', action='store_true', help='Install missing packages without asking')
    parser.add_argument('--only', help='Comma-separated acceptance check numbers')
    args = parser.parse_args()

    print("🔧 Shortness Lab Initialization")
    print("-" * 40)

    if not check_requirements(args.yes):
        sys.exit(1)

    from shortness_lab.cli import harness
    from shortness_lab.settings import load_settings

    print(f"\n🔍 Validating {args.config}...")
    try:
        settings = load_settings(args.config)
    except (FileNotFoundError, ValueError) as e:
        print(f"❌ {e}")
        sys.exit(1)
    print(f"   Budget: {settings.budget.describe()}")
    print(f"   Threads: {settings.threads}")

    only = [int(item) for item in args.only.split(',')] if args.only else None
    print(f"\n⚙️  Running {len(only) if only else len(harness.CHECKS)} quick acceptance checks...")
    results = harness.run_checks(quick=True, only=only)
    harness.format_results(results, harness.QUICK_BUDGET)

    failed = [name for name, result in results.items() if not result['success'] and not result['skipped']]
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
