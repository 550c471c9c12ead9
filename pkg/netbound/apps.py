from django.apps import AppConfig


class NetboundConfig(AppConfig):
    name = "netbound"
    verbose_name = "Network capacity bounds"
    default = True  # tell Django that this is the AppConfig to use (when more than one are present)

    def ready(self):
        from netbound import conf

        # raises ImproperlyConfigured on unknown NETBOUND keys
        conf.options()
