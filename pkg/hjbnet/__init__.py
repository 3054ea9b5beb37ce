"""
hjbnet - HJB 最优控制下的 Rössler 振子网络仿真
"""

__version__ = "1.0.0"
