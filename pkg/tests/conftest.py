import binceo.bounds

# library dataclass whose name matches pytest's collection prefix
binceo.bounds.TestChannelPair.__test__ = False
