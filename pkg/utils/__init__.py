"""类库、输入解析、报告输出、结果缓存与进程池"""
