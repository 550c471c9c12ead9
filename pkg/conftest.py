# conftest.py
#
# Lets pytest collect netbound's Django test modules by configuring Django
# the same way run_tests.py does.

from netbound.tests.boot_django import boot_django

boot_django()
