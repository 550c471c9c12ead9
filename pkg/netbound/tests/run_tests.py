#!/usr/bin/env python
# run_tests.py

import os
import sys

from django.core.management import call_command

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), os.pardir, os.pardir)))

from boot_django import boot_django, APP_NAME  # noqa: E402


boot_django()
print(f'running test for {APP_NAME}')
call_command('test', APP_NAME, '--exclude-tag=canary', verbosity=2)
