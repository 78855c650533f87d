from gridplan.core.types import AnnualProfiles, CostBook, DeviceParams, Line, NetworkModel
from gridplan.core.network_io import load_network, save_network
from gridplan.core.profiles_io import load_profiles, save_profiles
from gridplan.core.synthetic import synth_profiles

__all__ = [
    "NetworkModel",
    "Line",
    "AnnualProfiles",
    "DeviceParams",
    "CostBook",
    "load_network",
    "save_network",
    "load_profiles",
    "save_profiles",
    "synth_profiles",
]
