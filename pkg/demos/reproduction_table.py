# coding: utf-8
# # The full reproduction table
#
# Every built-in protocol, every bound, and the asymptotic and sharing
# comparisons in one table. Takes about a minute.

# In[1]:

from secomp.golden import golden_table

table = golden_table()
print(table.to_markdown())
