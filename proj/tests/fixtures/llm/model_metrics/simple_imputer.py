from sklearn.impute import SimpleImputer
imp_mf = SimpleImputer(strategy='most_frequent', missing_values=np.nan)
for col in scores.drop(['Gender', 'MathScore'], axis=1).columns:
  scores[col] = imp_mf.fit_transform(scores[[col]])