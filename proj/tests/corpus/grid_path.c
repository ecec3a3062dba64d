int main() {
  int t, n, m, i, j;
  scanf("%d", &t);
  while (t--) {
    scanf("%d %d", &n, &m);
    int g[n][m], cost[n][m];
    for (i = 0; i < n; i++)
      for (j = 0; j < m; j++)
        scanf("%d", &g[i][j]);
    cost[0][0] = g[0][0];
    for (j = 1; j < m; j++)
      cost[0][j] = cost[0][j - 1] + g[0][j];
    for (i = 1; i < n; i++)
      cost[i][0] = cost[i - 1][0] + g[i][0];
    for (i = 1; i < n; i++)
      for (j = 1; j < m; j++) {
        if (cost[i - 1][j] < cost[i][j - 1])
          cost[i][j] = cost[i - 1][j] + g[i][j];
        else
          cost[i][j] = cost[i][j - 1] + g[i][j];
      }
    printf("%d\n", cost[n - 1][m - 1]);
  }
  return 0;
}
