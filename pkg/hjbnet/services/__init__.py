"""
服务层：积分、后处理、扫描、电路模型和产物读写
"""
