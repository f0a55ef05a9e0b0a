# Test collection wiring: the suite uses Django's SimpleTestCase, which needs
# settings configured before test modules are imported under plain pytest.
import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "gatecheck_project.settings")
django.setup()
