"""
数学核心：向量场、最优控制律和定步长积分
"""
