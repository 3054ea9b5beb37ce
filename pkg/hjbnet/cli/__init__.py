"""
命令行入口，每个子命令一个模块
"""
