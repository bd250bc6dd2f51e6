"""
Sobolev Drift Lab
Strong approximation experiments for SDEs with a drift of fractional Sobolev regularity
"""
