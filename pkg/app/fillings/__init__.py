# Chains on tuples, controlled chain maps, fillings and the operator T
